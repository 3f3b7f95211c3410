#include <stdio.h>
enum Node { LOW, MID, HIGH };
enum Node walk(int x)
{
    enum Node val = LOW;
    if (x > 56) {
        val = HIGH;
    } else if (x > 17) {
        val = MID;
    }
    return val;
}
int main(void)
{
    int x = 59;
    enum Node t = walk(x);
    printf("%d\n", (int)t);
    return 0;
}
