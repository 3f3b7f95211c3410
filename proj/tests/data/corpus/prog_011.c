#include <stdio.h>
int measure(int pos, int b)
{
    int acc = 0;
    int val = 1;
    while (val <= pos) {
        if (val % b == 0)
            acc++;
        val++;
    }
    return acc;
}
int main(void)
{
    int pos = 411;
    int b = 2;
    int acc = measure(pos, b);
    printf("%d\n", acc);
    return 0;
}
