#include <stdio.h>
int walk(int pos, int a)
{
    int k = 0;
    int val = 1;
    while (val <= pos) {
        if (val % a == 0)
            k++;
        val++;
    }
    return k;
}
int main(void)
{
    int pos = 175;
    int a = 7;
    int k = walk(pos, a);
    printf("%d\n", k);
    return 0;
}
