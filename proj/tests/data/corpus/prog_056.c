#include <stdio.h>
enum Node { LOW, MID, HIGH };
enum Node blend(int n)
{
    enum Node prev = LOW;
    if (n > 65) {
        prev = HIGH;
    } else if (n > 15) {
        prev = MID;
    }
    return prev;
}
int main(void)
{
    int n = 85;
    enum Node count = blend(n);
    printf("%d\n", (int)count);
    return 0;
}
